def execute_command(image):
    image_patch = ImagePatch(image)
    door_patches = image_patch.find('door')
    if len(door_patches) == 0:
        return {'function': 'None', 'error': 'No door found.'}
    door = door_patches[0]
    candidates = []
    for plant in image_patch.find('plant'):
        if plant.horizontal_center < door.horizontal_center:
            candidates.append(plant)
    if len(candidates) == 0:
        return {'function': 'None', 'error': 'No plant to the left of the door.'}
    candidates.sort(key=lambda x: x.horizontal_center)
    plant = candidates[-1]
    return {'function': 'navigate_to_object', 'inputs': (plant.horizontal_center, plant.vertical_center), 'box': [plant.left, plant.lower, plant.right, plant.upper]}
