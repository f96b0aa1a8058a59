def execute_command(image):
    image_patch = ImagePatch(image)
    speaker_patches = image_patch.find('speaker')
    for speaker in speaker_patches:
        if speaker.verify_property('speaker', 'black'):
            return {'function': 'navigate_to_object', 'inputs': (speaker.horizontal_center, speaker.vertical_center), 'box': [speaker.left, speaker.lower, speaker.right, speaker.upper]}
    return {'function': 'None', 'error': 'No black speaker found.'}
